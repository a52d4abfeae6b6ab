#pragma once

// Umbrella header.

#include "pcgp/bench.hpp"
#include "pcgp/config.hpp"
#include "pcgp/crossover.hpp"
#include "pcgp/decode.hpp"
#include "pcgp/dot.hpp"
#include "pcgp/error.hpp"
#include "pcgp/evolve.hpp"
#include "pcgp/execute.hpp"
#include "pcgp/functions.hpp"
#include "pcgp/genome.hpp"
#include "pcgp/mutate.hpp"
#include "pcgp/rng.hpp"
#include "pcgp/runner.hpp"
