#pragma once

// Coded gradient aggregation with Byzantine fault location: redundant
// allocation, Vandermonde block encoding with compression, exact-recovery
// decoding, attack models, and a deterministic parameter-server simulator.

#include "solon/adversary.hpp"
#include "solon/allocation.hpp"
#include "solon/codec.hpp"
#include "solon/config.hpp"
#include "solon/decoder.hpp"
#include "solon/digitcodec.hpp"
#include "solon/errors.hpp"
#include "solon/oracle.hpp"
#include "solon/parallel.hpp"
#include "solon/probe.hpp"
#include "solon/rng.hpp"
#include "solon/runner.hpp"
#include "solon/sim.hpp"
#include "solon/weights.hpp"
