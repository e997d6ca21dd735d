#pragma once

#include "aubin/rational.hpp"
#include "aubin/linalg.hpp"
#include "aubin/double_description.hpp"
#include "aubin/cones.hpp"
#include "aubin/polynomial.hpp"
#include "aubin/problem.hpp"
#include "aubin/branches.hpp"
#include "aubin/verifier.hpp"
#include "aubin/oracle.hpp"
#include "aubin/report.hpp"
