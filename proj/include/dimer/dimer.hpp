#pragma once

#include "dimer/asymptotics.hpp"
#include "dimer/bead.hpp"
#include "dimer/correlations.hpp"
#include "dimer/errors.hpp"
#include "dimer/kasteleyn.hpp"
#include "dimer/logcomplex.hpp"
#include "dimer/matrix.hpp"
#include "dimer/numeric.hpp"
#include "dimer/torus.hpp"
