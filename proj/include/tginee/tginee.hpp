#pragma once

#include "tginee/covariance.hpp"
#include "tginee/errors.hpp"
#include "tginee/estimator.hpp"
#include "tginee/eval.hpp"
#include "tginee/factors.hpp"
#include "tginee/graph.hpp"
#include "tginee/jacobian.hpp"
#include "tginee/link.hpp"
#include "tginee/rng.hpp"
#include "tginee/sampling.hpp"
#include "tginee/synth.hpp"
