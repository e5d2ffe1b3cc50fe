#pragma once

// Umbrella header: the full lattice passage-time toolkit.

#include "percolab/cone.hpp"
#include "percolab/config.hpp"
#include "percolab/errors.hpp"
#include "percolab/field.hpp"
#include "percolab/gadgets.hpp"
#include "percolab/geometry.hpp"
#include "percolab/hilbert_fpp.hpp"
#include "percolab/io.hpp"
#include "percolab/rational.hpp"
#include "percolab/rng.hpp"
#include "percolab/scalar_fpp.hpp"
#include "percolab/values.hpp"
