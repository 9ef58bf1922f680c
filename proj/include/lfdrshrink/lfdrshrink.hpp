#pragma once

#include "lfdrshrink/confidence_posterior.hpp"
#include "lfdrshrink/error.hpp"
#include "lfdrshrink/io.hpp"
#include "lfdrshrink/lfdr.hpp"
#include "lfdrshrink/marginal_posterior.hpp"
#include "lfdrshrink/numerics.hpp"
#include "lfdrshrink/pipeline.hpp"
#include "lfdrshrink/random.hpp"
#include "lfdrshrink/simulation.hpp"
