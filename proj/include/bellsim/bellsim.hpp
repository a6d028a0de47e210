#pragma once

#include "bellsim/angle.hpp"
#include "bellsim/chsh.hpp"
#include "bellsim/io.hpp"
#include "bellsim/model.hpp"
#include "bellsim/montecarlo.hpp"
#include "bellsim/parallel.hpp"
#include "bellsim/rng.hpp"
#include "bellsim/svg.hpp"
