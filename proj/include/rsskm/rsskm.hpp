#ifndef RSSKM_RSSKM_HPP
#define RSSKM_RSSKM_HPP

#include "rsskm/bootstrap.hpp"
#include "rsskm/config.hpp"
#include "rsskm/csv_io.hpp"
#include "rsskm/error.hpp"
#include "rsskm/harness.hpp"
#include "rsskm/population_models.hpp"
#include "rsskm/rng.hpp"
#include "rsskm/rss_estimator.hpp"
#include "rsskm/sampling.hpp"
#include "rsskm/survival_core.hpp"

#endif // RSSKM_RSSKM_HPP
