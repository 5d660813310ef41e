#include "curveprop/errors.hpp"
#include "curveprop/parallel.hpp"
#include "curveprop/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
  using namespace curveprop;

  CLI::App app{"Curve-restricted dispersive evolution experiments"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  int threads = 0;

  const char* names[] = {"propagate", "rate-fit", "maximal", "lower-bound", "decompose", "kernel-decay"};
  for (const char* name : names) {
    auto* sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (threads == 0) {
    if (const char* env = std::getenv("CURVEPROP_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || v < 1) {
        std::cerr << "error: validation: CURVEPROP_THREADS must be a positive integer\n";
        return 2;
      }
      threads = static_cast<int>(v);
    }
  }
  if (threads > 0)
    set_worker_count(threads);

  try {
    RunRequest req;
    req.command = experiment_kind_from_string(app.get_subcommands().front()->get_name());
    req.config_path = config_path;
    if (!out_dir.empty())
      req.out_dir = out_dir;
    const auto dir = run(req);
    std::cout << (dir / "summary.json").string() << '\n';
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
}
