#pragma once

#include "fairsharpe/dataset.hpp"
#include "fairsharpe/errors.hpp"
#include "fairsharpe/fairness.hpp"
#include "fairsharpe/model.hpp"
#include "fairsharpe/pareto.hpp"
#include "fairsharpe/rng.hpp"
#include "fairsharpe/sgd.hpp"
#include "fairsharpe/sharpe.hpp"
