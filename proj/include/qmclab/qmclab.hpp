#pragma once

#include "qmclab/error.hpp"
#include "qmclab/random.hpp"
#include "qmclab/graph.hpp"
#include "qmclab/instances.hpp"
#include "qmclab/sdp.hpp"
#include "qmclab/rounding.hpp"
#include "qmclab/special_functions.hpp"
#include "qmclab/quadrature.hpp"
#include "qmclab/spherical.hpp"
#include "qmclab/quantum.hpp"
#include "qmclab/boolean_fourier.hpp"
