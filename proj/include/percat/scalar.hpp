#pragma once

#include <cassert>
#include <cstdint>
#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace percat {

// Ground field of a session: the rationals or a prime field F_p.
// Every Scalar carries its field so that mixed-field arithmetic is caught
// immediately instead of producing garbage.
struct Field {
    enum class Kind { rationals, prime };
    Kind kind = Kind::rationals;
    unsigned long p = 0;

    static Field rationals() { return Field{Kind::rationals, 0}; }
    static Field prime(unsigned long p) {
        if (p < 2) throw std::invalid_argument("prime field needs p >= 2");
        return Field{Kind::prime, p};
    }
    bool is_prime_field() const { return kind == Kind::prime; }
    bool operator==(const Field& o) const { return kind == o.kind && p == o.p; }
    bool operator!=(const Field& o) const { return !(*this == o); }
    std::string to_string() const {
        return is_prime_field() ? "fp:" + std::to_string(p) : "q";
    }
};

class Scalar {
public:
    Scalar() : field_(Field::rationals()), v_(0) {}
    Scalar(Field f, long n) : field_(f), v_(n) { normalize(); }
    Scalar(Field f, const mpq_class& q) : field_(f), v_(q) { normalize(); }

    static Scalar zero(Field f) { return Scalar(f, 0); }
    static Scalar one(Field f) { return Scalar(f, 1); }

    const Field& field() const { return field_; }
    const mpq_class& value() const { return v_; }
    bool is_zero() const { return v_ == 0; }

    Scalar operator+(const Scalar& o) const { return make(v_ + o.v_, o); }
    Scalar operator-(const Scalar& o) const { return make(v_ - o.v_, o); }
    Scalar operator*(const Scalar& o) const { return make(v_ * o.v_, o); }
    Scalar operator-() const { return Scalar(field_, -v_); }

    Scalar operator/(const Scalar& o) const {
        assert(field_ == o.field_);
        if (o.is_zero()) throw std::domain_error("division by zero");
        if (!field_.is_prime_field()) return Scalar(field_, v_ / o.v_);
        return *this * o.inverse();
    }

    Scalar inverse() const {
        if (is_zero()) throw std::domain_error("inverse of zero");
        if (!field_.is_prime_field()) return Scalar(field_, 1 / v_);
        mpz_class inv;
        if (!mpz_invert(inv.get_mpz_t(), v_.get_num().get_mpz_t(),
                        mpz_class(field_.p).get_mpz_t()))
            throw std::domain_error("non-invertible element mod p");
        return Scalar(field_, mpq_class(inv));
    }

    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    bool operator==(const Scalar& o) const {
        assert(field_ == o.field_);
        return v_ == o.v_;
    }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    std::string to_string() const { return v_.get_str(); }

private:
    Field field_;
    mpq_class v_;

    Scalar make(const mpq_class& q, const Scalar& o) const {
        assert(field_ == o.field_);
        return Scalar(field_, q);
    }

    void normalize() {
        v_.canonicalize();
        if (field_.is_prime_field()) {
            // prime-field values are kept as canonical representatives in [0, p)
            mpz_class p(field_.p);
            mpz_class num = v_.get_num(), den = v_.get_den();
            if (den != 1) {
                mpz_class dinv;
                if (!mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t()))
                    throw std::domain_error("denominator not invertible mod p");
                num *= dinv;
            }
            mpz_class r = num % p;
            if (r < 0) r += p;
            v_ = mpq_class(r);
        }
    }
};

// Exact filtration parameter. Levels are rationals; +inf (e.g. barcode deaths,
// exhausted searches) is represented by std::optional<Level> at use sites.
class Level {
public:
    Level() : v_(0) {}
    Level(long n) : v_(n) {}
    Level(long num, long den) : v_(num, den) { v_.canonicalize(); }
    explicit Level(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    const mpq_class& value() const { return v_; }

    Level operator+(const Level& o) const { return Level(v_ + o.v_); }
    Level operator-(const Level& o) const { return Level(v_ - o.v_); }
    Level operator-() const { return Level(-v_); }
    Level operator*(long k) const { return Level(v_ * k); }
    Level& operator+=(const Level& o) { v_ += o.v_; return *this; }
    Level& operator-=(const Level& o) { v_ -= o.v_; return *this; }

    auto operator<=>(const Level& o) const {
        int c = cmp(v_, o.v_);
        return c <=> 0;
    }
    bool operator==(const Level& o) const { return v_ == o.v_; }

    std::string to_string() const { return v_.get_str(); }

private:
    mpq_class v_;
};

inline Level level_min(const Level& a, const Level& b) { return a < b ? a : b; }
inline Level level_max(const Level& a, const Level& b) { return a < b ? b : a; }

} // namespace percat
