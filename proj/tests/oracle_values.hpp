#pragma once

// Values produced by tests/oracle/oracle.py (mpmath at 50 digits, numpy
// sieve, trial division, exact rational arithmetic). Re-run that script to
// reproduce them; none of these come from the C++ code.

#include <cstdint>
#include <vector>

namespace oracle {

inline constexpr std::uint64_t kPrimesBelowMillion = 78498;
inline const std::vector<std::uint64_t> kPrimesAfterMillion = {1000003, 1000033, 1000037, 1000039, 1000081, 1000099};
inline constexpr double kMertensMillion = 2.887328099567673;
inline constexpr double kMertensMillionExcess = 3.89722440193e-5;  // minus loglog y and the Mertens constant

inline constexpr double kLog2OfE8 = 2.91347398692779;

inline constexpr double kX4C0_3 = 371.18240173322;
inline constexpr double kX6C0_5 = 68.0808396175334;
inline constexpr double kX7C0_5 = 1211.15177397197;
inline constexpr double kX8C0_5 = 414910.169000873;
inline constexpr double kX9C0_5 = 122787584895.813;
inline constexpr double kEE = 15.1542622414793;

// point_at(100) with C0 = 3
inline constexpr double kH100 = 1.5271796258079;
inline constexpr double kPsi100 = 2.31190615533405;
inline constexpr double kEps100 = 0.950614022075561;
inline constexpr double kLogF100 = -0.953687109495168;
inline constexpr double kF100 = 0.385317692555675;

// eps(34) with C0 = 3 and the resulting cutoff x_3^eps(34)
inline constexpr double kEps34 = 0.891651106835072;
inline constexpr double kCutoff34 = 11.2882120638308;

// A with C0 = 3 up to 35, by brute force over the membership rule
inline const std::vector<std::uint64_t> kA3UpTo35 = {17, 19, 21, 22, 23, 26, 29, 30, 31, 33, 34, 35};

// |A cap [1, 1e5]| and S(1e5)
inline constexpr std::uint64_t kCountC0_3 = 59836;
inline constexpr std::uint64_t kCountC0_4 = 60783;
inline constexpr std::uint64_t kCountC0_5 = 60783;
inline constexpr double kSC0_3 = 5.259532064788543;
inline constexpr double kSC0_5 = 5.294127070664757;

// A with C0 = 5 up to 3000, exact rational pairwise defect
inline constexpr std::uint64_t kCountC0_5_3000 = 1813;
inline constexpr double kSC0_5_3000 = 3.162070499435493;
inline constexpr double kDefectC0_5_3000 = 1.9799253782710782;

inline constexpr double kLogAllPrimes100Lhs = 3.835567134428024;
inline constexpr double kLogAllPrimes100Rhs = 5.06189694760781;
inline constexpr double kLgr235Rhs = 0.5338888888888889;
inline constexpr double kLgr235Ratio = 0.6243496357960457;

// log F(x_k) - log F(x_k^+) over k = k_min+1 .. k_min+100 for C0 = 3, 4, 5
inline constexpr double kFJumpMin = -1.25863890014417;
inline constexpr double kFJumpMax = -0.00964973965943693;

}  // namespace oracle
