#pragma once

// Umbrella header: budget-constrained human-rater triage for machine-scored
// tests, with guarantee estimation and synthetic experiment tooling.

#include "triage/aggregate.hpp"
#include "triage/agreement.hpp"
#include "triage/core.hpp"
#include "triage/estimator.hpp"
#include "triage/experiment.hpp"
#include "triage/io.hpp"
#include "triage/metrics.hpp"
#include "triage/rng.hpp"
#include "triage/samplers.hpp"
#include "triage/svg_plot.hpp"
#include "triage/synthetic.hpp"
