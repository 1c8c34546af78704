#pragma once

#include "gausscurve/core.hpp"
#include "gausscurve/parallel.hpp"
#include "gausscurve/geometry.hpp"
#include "gausscurve/stencil.hpp"
#include "gausscurve/operator.hpp"
#include "gausscurve/solver.hpp"
#include "gausscurve/analysis.hpp"
#include "gausscurve/oned.hpp"
#include "gausscurve/expression.hpp"
#include "gausscurve/io.hpp"
