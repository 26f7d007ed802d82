#pragma once

#include "hypervor/bounds.hpp"
#include "hypervor/coloring.hpp"
#include "hypervor/dual_graph.hpp"
#include "hypervor/errors.hpp"
#include "hypervor/io.hpp"
#include "hypervor/kernel.hpp"
#include "hypervor/pipeline.hpp"
#include "hypervor/polytope.hpp"
#include "hypervor/rational.hpp"
#include "hypervor/rng.hpp"
#include "hypervor/thick_net.hpp"
#include "hypervor/tolerances.hpp"
#include "hypervor/voronoi.hpp"
#include "hypervor/words.hpp"
