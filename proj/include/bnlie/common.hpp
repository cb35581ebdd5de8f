#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace bnlie {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double PI = 3.141592653589793238462643383279502884;

// Argument outside the domain of an operation (|p| >= 1, gate violation, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative procedure stopped before reaching its tolerance.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

// Evaluation point too close to a pole; carries lattice indices when known.
class PoleError : public std::runtime_error {
public:
    PoleError(const std::string& what, long m = 0, long n = 0)
        : std::runtime_error(what), m_(m), n_(n) {}
    long m() const { return m_; }
    long n() const { return n_; }

private:
    long m_, n_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bnlie
