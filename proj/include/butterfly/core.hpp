#pragma once

// Shared scalar types and failure categories. All integer arithmetic on
// matrix entries, denominators and gap labels is overflow-checked 64-bit:
// a silent wrap would corrupt a factorization or a label long before any
// floating-point check could notice.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace butterfly {

using i64 = std::int64_t;

// A floating-point procedure could not certify its result (root count off,
// integrality check failed, symmetry check failed, ...).
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Checked arithmetic overflowed. Subclass of numerical_error so callers that
// only distinguish "bad input" from "computation failed" treat it as the latter.
struct overflow_error : numerical_error {
    explicit overflow_error(const std::string& what) : numerical_error(what) {}
};

inline i64 checked_add(i64 a, i64 b) {
    i64 r;
    if (__builtin_add_overflow(a, b, &r)) throw overflow_error("int64 overflow in add");
    return r;
}

inline i64 checked_sub(i64 a, i64 b) {
    i64 r;
    if (__builtin_sub_overflow(a, b, &r)) throw overflow_error("int64 overflow in sub");
    return r;
}

inline i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw overflow_error("int64 overflow in mul");
    return r;
}

inline i64 checked_neg(i64 a) { return checked_sub(0, a); }

}  // namespace butterfly
