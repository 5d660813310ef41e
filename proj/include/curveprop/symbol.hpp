#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace curveprop {

enum class SymbolKind
{
  elliptic,     ///< |xi|^2
  nonelliptic,  ///< xi_1^2 - xi_2^2 +- ... +- xi_n^2
  fractional,   ///< |xi|^a, a > 1
  polynomial2d, ///< xi_1^m1 + sigma * xi_2^m2, 2 <= m1 <= m2
  polynomial,   ///< sparse user table exponent -> coefficient
};

std::string to_string(SymbolKind kind);
SymbolKind symbol_kind_from_string(const std::string& name);

/// Real phase function P(xi) with declared polynomial growth order.
/// Immutable value type; evaluation is pure.
class Symbol
{
public:
  using ExponentTable = std::map<std::vector<int>, double>;

  static Symbol elliptic(int n);
  /// `signs` gives the sign of each xi_j^2; signs[0] must be +1 and at
  /// least one entry must be -1.
  static Symbol nonelliptic(std::vector<int> signs);
  /// Default signature (+, -, -, ..., -).
  static Symbol nonelliptic(int n);
  static Symbol fractional(int n, double exponent);
  static Symbol polynomial2d(int m1, int m2, int sigma);
  static Symbol polynomial(int n, ExponentTable terms);

  int dimension() const { return n_; }
  SymbolKind kind() const { return kind_; }

  /// Declared growth order m: 2 (elliptic/nonelliptic), a (fractional),
  /// m2 (polynomial2d) or the total degree (user polynomial).
  double growth_order() const;

  /// P(xi). Throws InvalidArgument on dimension mismatch.
  double operator()(std::span<const double> xi) const;

  int m1() const { return m1_; }
  int m2() const { return m2_; }
  int sigma() const { return sigma_; }
  double exponent() const { return exponent_; }
  const std::vector<int>& signs() const { return signs_; }
  const ExponentTable& terms() const { return terms_; }

  bool operator==(const Symbol&) const = default;

private:
  Symbol() = default;
  double evaluate(std::span<const double> xi) const;

  SymbolKind kind_ = SymbolKind::elliptic;
  int n_ = 1;
  int m1_ = 0;
  int m2_ = 0;
  int sigma_ = 1;
  double exponent_ = 2.0;
  std::vector<int> signs_;
  ExponentTable terms_;
};

double eval_symbol(const Symbol& sym, std::span<const double> xi);
double growth_order(const Symbol& sym);

/// Sample points on the sphere |xi| = radius: both points for n = 1,
/// equally spaced angles for n = 2 (axes included when count % 4 == 0),
/// coordinate axes plus seeded directions for n >= 3.
std::vector<std::vector<double>> sphere_samples(int n, double radius, int count);

/// Least-squares slope of log max_{|xi|=R}|P| against log R.
double fit_growth(const Symbol& sym, std::span<const double> radii, int samples_per_sphere);

/// max_{|xi|=R}|P(xi)| over sphere_samples(n, R, samples).
double sphere_max(const Symbol& sym, double radius, int samples);

} // namespace curveprop
