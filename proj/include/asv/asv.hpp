#pragma once

#include "asv/chain.hpp"
#include "asv/csv.hpp"
#include "asv/difference.hpp"
#include "asv/dist.hpp"
#include "asv/dsptheory.hpp"
#include "asv/error.hpp"
#include "asv/evaluate.hpp"
#include "asv/linalg.hpp"
#include "asv/model.hpp"
#include "asv/omori.hpp"
#include "asv/rng.hpp"
#include "asv/samplers.hpp"
#include "asv/simulate.hpp"
#include "asv/stats.hpp"

namespace asv {
inline constexpr const char* kVersion = "0.1.0";
}
