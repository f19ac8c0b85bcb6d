#pragma once

// Umbrella header.

#include "hypersteiner/baselines.hpp"
#include "hypersteiner/bench.hpp"
#include "hypersteiner/datagen.hpp"
#include "hypersteiner/errors.hpp"
#include "hypersteiner/fermat.hpp"
#include "hypersteiner/heuristics.hpp"
#include "hypersteiner/io.hpp"
#include "hypersteiner/klein.hpp"
#include "hypersteiner/predicates.hpp"
#include "hypersteiner/random.hpp"
#include "hypersteiner/render.hpp"
#include "hypersteiner/riemannian.hpp"
#include "hypersteiner/tree.hpp"
#include "hypersteiner/triangulation.hpp"
