#pragma once

// Everything: exact arithmetic and series, Grassmann integrals, Chern
// calculus, root data, wall geometry, pairings, the rank 2 desingularisation,
// the Gaussian partition function, and the command layer.

#include "modpair/errors.hpp"
#include "modpair/rational.hpp"
#include "modpair/series.hpp"
#include "modpair/grassmann.hpp"
#include "modpair/chern.hpp"
#include "modpair/roots.hpp"
#include "modpair/walls.hpp"
#include "modpair/pairing.hpp"
#include "modpair/desing.hpp"
#include "modpair/witten.hpp"
#include "modpair/report.hpp"
#include "modpair/cli.hpp"
