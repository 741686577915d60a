#pragma once

#include "minplus/quadratic_form.hpp"
#include "minplus/value_function.hpp"
#include "minplus/system.hpp"
#include "minplus/propagation.hpp"
#include "minplus/filter.hpp"
#include "minplus/scenario.hpp"
#include "minplus/simulator.hpp"
#include "minplus/oracle.hpp"
#include "minplus/certify.hpp"
#include "minplus/io.hpp"
