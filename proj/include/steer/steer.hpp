// steer.hpp: umbrella header

#pragma once

#include "steer/closed_forms.hpp"
#include "steer/criteria.hpp"
#include "steer/error.hpp"
#include "steer/inference.hpp"
#include "steer/io.hpp"
#include "steer/linalg.hpp"
#include "steer/observables.hpp"
#include "steer/oracle.hpp"
#include "steer/states.hpp"
#include "steer/threshold.hpp"
