#pragma once

#include "lcmlab/prime_engine.hpp"

namespace testing_support {

/// One sieve to 10^6 shared by every test in the binary.
inline const lcmlab::SpfTable& table() {
    static const lcmlab::SpfTable t = lcmlab::build_spf(1'000'000);
    return t;
}

}  // namespace testing_support
