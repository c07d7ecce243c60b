#ifndef SCAFFOLD_ERRORS_HPP
#define SCAFFOLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scaffold {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- residue field / series layer ---

class NotPrime : public Error {
public:
    explicit NotPrime(long long p) : Error("not a prime: " + std::to_string(p)) {}
};

class DegreeTooLarge : public Error {
public:
    DegreeTooLarge(long long p, int d)
        : Error("field F_" + std::to_string(p) + "^" + std::to_string(d) +
                " exceeds the desk-scale cap") {}
};

class FieldMismatch : public Error {
public:
    FieldMismatch() : Error("operands belong to different residue fields") {}
};

class DivideByZero : public Error {
public:
    DivideByZero() : Error("division by exact zero") {}
};

class IndeterminatePrecision : public Error {
public:
    explicit IndeterminatePrecision(const std::string& what)
        : Error("indeterminate precision: " + what) {}
};

class IndeterminateValuation : public Error {
public:
    explicit IndeterminateValuation(long long bound)
        : Error("valuation indeterminate: all stored coefficients vanish below "
                "precision " + std::to_string(bound)),
          bound_(bound) {}
    long long bound() const { return bound_; }
private:
    long long bound_;
};

// --- tower / scaffold layer ---

class TowerMismatch : public Error {
public:
    TowerMismatch() : Error("operands belong to different towers") {}
};

class SpecInvariantViolation : public Error {
public:
    SpecInvariantViolation(const std::string& which, int index)
        : Error("tower spec invariant violated: " + which +
                " (index " + std::to_string(index) + ")") {}
};

class PrecisionInsufficient : public Error {
public:
    explicit PrecisionInsufficient(const std::string& what)
        : Error("working precision insufficient: " + what) {}
};

class WpVanishes : public Error {
public:
    WpVanishes(int i, int j)
        : Error("wp(Omega_{" + std::to_string(i) + "," + std::to_string(j) +
                "}) = 0; omega data invalid") {}
};

class PreconditionViolation : public Error {
public:
    explicit PreconditionViolation(const std::string& which)
        : Error("precondition violated: " + which) {}
};

// --- numeric layer ---

class AssumptionViolation : public Error {
public:
    explicit AssumptionViolation(const std::string& which)
        : Error("assumption violated: " + which) {}
};

class NonIntegralUpperBreaks : public Error {
public:
    explicit NonIntegralUpperBreaks(int index)
        : Error("upper break u_" + std::to_string(index) + " is not an integer"),
          index_(index) {}
    int index() const { return index_; }
private:
    int index_;
};

class OrderViolation : public Error {
public:
    explicit OrderViolation(const std::string& what)
        : Error("break ordering violated: " + what) {}
};

class FamilyPreconditionViolation : public Error {
public:
    explicit FamilyPreconditionViolation(const std::string& what)
        : Error("family precondition violated: " + what) {}
};

// --- hopf layer ---

class NotMinusOneResidue : public Error {
public:
    NotMinusOneResidue(int i, long long b)
        : Error("b_" + std::to_string(i) + " = " + std::to_string(b) +
                " is not congruent to -1 modulo p^n") {}
};

class ValidationFailed : public Error {
public:
    explicit ValidationFailed(const std::string& what)
        : Error("Hopf parameter validation failed: " + what) {}
};

} // namespace scaffold

#endif
