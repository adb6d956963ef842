#pragma once

#include <array>
#include <string_view>

#include <gmpxx.h>

namespace bbmap {

// Coefficients (c2, c1, c0) of the monic characteristic polynomial, exact over Q.
std::array<mpq_class, 3> char_poly_exact(std::string_view letters, const mpq_class& r, bool reduced);

}  // namespace bbmap
