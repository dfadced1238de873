#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sphfun {

using cplx = std::complex<double>;

inline constexpr const char* kSchema = "sphfun/1";

// exit-code mapping: validation_error -> 2, convergence_error -> 3
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Problem tuple for one eigenpair of
//   d/dxi[(xi^2+1) X'] - [lambda + p^2(xi^2+1) - a xi - m^2/(xi^2+1)] X = 0
// on the whole axis, X in L2(R).
struct SpectralParams {
    int m = 0;          // azimuthal index, >= 0
    int k = 0;          // target node count, >= 0
    double p = 1.0;     // energy-like parameter, > 0
    double a = 0.0;     // charge parameter
    double tol = 1e-10; // eigenvalue tolerance, > 0
    int N = 0;          // truncation order; 0 = auto, else >= 8
};

inline const SpectralParams& validate(const SpectralParams& sp) {
    if (!(sp.p > 0.0)) throw validation_error("p must be positive");
    if (sp.m < 0) throw validation_error("m must be nonnegative");
    if (sp.k < 0) throw validation_error("k must be nonnegative");
    if (!(sp.tol > 0.0)) throw validation_error("tol must be positive");
    if (sp.N != 0 && sp.N < 8) throw validation_error("N must be >= 8");
    if (!std::isfinite(sp.a)) throw validation_error("a must be finite");
    return sp;
}

// Generalized-Jaffe representation: one complex set per branch; the second
// set of each branch is fixed as the elementwise conjugate (reality).
struct TrigSeriesRep {
    SpectralParams params;
    double lambda = 0.0;
    std::vector<cplx> right_coeffs; // f(1)_0..f(1)_N, branch t in [0,1)
    std::vector<cplx> left_coeffs;  // g(1)_0..g(1)_N, branch t in (-1,0]
    double scale = 1.0;             // amplitude A
};

enum class Parity { even, odd };

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

// Which half-axis a sided construction belongs to.
enum class Branch { right, left };

// a = 0 power representation in u = (1+t^2)/2.
struct PowerSeriesRep {
    SpectralParams params; // a must be 0
    double lambda = 0.0;
    Parity parity = Parity::even;
    std::vector<double> coeffs; // f_{j,0}..f_{j,N}
};

struct Diagnostics {
    double det_value = 0.0;   // matching-determinant measure at lambda
    double residual_max = 0.0;
    int N_used = 0;
    bool converged = false;
};

struct EigenSolution {
    double lambda = 0.0;
    int node_count = 0;
    std::variant<TrigSeriesRep, PowerSeriesRep> rep;
    Diagnostics diagnostics;

    const SpectralParams& params() const {
        if (auto* t = std::get_if<TrigSeriesRep>(&rep)) return t->params;
        return std::get<PowerSeriesRep>(rep).params;
    }
};

struct GridFunction {
    std::vector<double> xi; // strictly increasing
    std::vector<double> x;  // X values
    std::vector<double> dx; // X' values
};

struct RingConfig {
    int m = 0;
    double U0 = 0.0;     // well depth, >= 0
    double xi0 = 1.0;    // well boundary, > 0
    double R = 1.0;      // focal size, > 0
    double lambda = 0.0; // separation constant (input)
    double E_min = 0.0;  // scan interval (E_min < E_max)
    double E_max = 0.0;
    double tol = 1e-10;
};

inline const RingConfig& validate(const RingConfig& rc) {
    if (rc.m < 0) throw validation_error("m must be nonnegative");
    if (!(rc.U0 >= 0.0)) throw validation_error("U0 must be nonnegative");
    if (!(rc.xi0 > 0.0)) throw validation_error("xi0 must be positive");
    if (!(rc.R > 0.0)) throw validation_error("R must be positive");
    if (!(rc.E_min < rc.E_max)) throw validation_error("E_range must be nonempty");
    if (!(rc.tol > 0.0)) throw validation_error("tol must be positive");
    if (!std::isfinite(rc.lambda)) throw validation_error("lambda must be finite");
    return rc;
}

struct RingLevel {
    double E = 0.0;
    double s = 0.0; // |E| R^2 / 2 (the paper's p^2 = -s)
    Parity parity = Parity::even;
    double mismatch = 0.0;
    GridFunction interior;
    GridFunction exterior;
};

} // namespace sphfun
