#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace limitlearn {

/// A natural number or the distinguished infinite value OMEGA.
///
/// Ordered so that every finite value is below OMEGA. Addition saturates at
/// OMEGA, and finite sums that would overflow 64 bits are rejected.
class ExtNat {
 public:
  constexpr ExtNat() = default;
  constexpr ExtNat(std::uint64_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtNat omega() {
    ExtNat n;
    n.omega_ = true;
    return n;
  }

  constexpr bool is_omega() const { return omega_; }
  constexpr bool is_finite() const { return !omega_; }
  constexpr bool is_zero() const { return !omega_ && value_ == 0; }

  std::uint64_t value() const {
    if (omega_) throw std::domain_error("ExtNat::value on OMEGA");
    return value_;
  }

  constexpr auto operator<=>(const ExtNat&) const = default;

  friend ExtNat operator+(ExtNat a, ExtNat b) {
    if (a.omega_ || b.omega_) return omega();
    if (a.value_ > std::numeric_limits<std::uint64_t>::max() - b.value_)
      throw std::overflow_error("ExtNat addition overflow");
    return ExtNat(a.value_ + b.value_);
  }
  ExtNat& operator+=(ExtNat o) { return *this = *this + o; }

  /// Truncated subtraction; OMEGA - finite = OMEGA, anything - OMEGA = 0.
  friend ExtNat saturating_sub(ExtNat a, ExtNat b) {
    if (b.omega_) return ExtNat(0);
    if (a.omega_) return omega();
    return ExtNat(a.value_ > b.value_ ? a.value_ - b.value_ : 0);
  }

  std::string to_string() const { return omega_ ? "w" : std::to_string(value_); }

  friend std::ostream& operator<<(std::ostream& os, ExtNat n) { return os << n.to_string(); }

 private:
  // omega_ first so the defaulted comparison puts OMEGA above every finite value.
  bool omega_ = false;
  std::uint64_t value_ = 0;
};

inline constexpr ExtNat kOmega = ExtNat::omega();

}  // namespace limitlearn
