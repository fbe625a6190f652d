#pragma once

#include "iwlearn/active.hpp"
#include "iwlearn/data_io.hpp"
#include "iwlearn/errors.hpp"
#include "iwlearn/example.hpp"
#include "iwlearn/lambert_w.hpp"
#include "iwlearn/learner.hpp"
#include "iwlearn/losses.hpp"
#include "iwlearn/ode_oracle.hpp"
#include "iwlearn/report.hpp"
#include "iwlearn/rng.hpp"
#include "iwlearn/scales.hpp"
#include "iwlearn/schedule.hpp"
