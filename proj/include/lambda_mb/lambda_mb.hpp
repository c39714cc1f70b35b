#pragma once

// Umbrella header for the Lambda-type Maxwell-Bloch toolkit.

#include "lambda_mb/algebra.hpp"
#include "lambda_mb/analytic.hpp"
#include "lambda_mb/darboux.hpp"
#include "lambda_mb/error.hpp"
#include "lambda_mb/grid.hpp"
#include "lambda_mb/mbsolver.hpp"
#include "lambda_mb/model.hpp"
#include "lambda_mb/scenario.hpp"
#include "lambda_mb/verify.hpp"
