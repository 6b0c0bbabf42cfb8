#pragma once

/// @file genelab.hpp
/// Umbrella header for the genelab genetic-algorithm library.

#include "core.hpp"
#include "operators.hpp"
#include "selection.hpp"
#include "engine.hpp"
#include "test_functions.hpp"
#include "benchmark.hpp"
