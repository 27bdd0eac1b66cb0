#pragma once

#include "gflock/episode.hpp"
#include "gflock/errors.hpp"
#include "gflock/ga.hpp"
#include "gflock/geometry.hpp"
#include "gflock/metrics.hpp"
#include "gflock/rng.hpp"
#include "gflock/rules.hpp"
#include "gflock/scenario.hpp"
#include "gflock/sim.hpp"
#include "gflock/swarm.hpp"
#include "gflock/text.hpp"
#include "gflock/vec2.hpp"
