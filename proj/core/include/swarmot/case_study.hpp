#pragma once

#include "swarmot/types.hpp"

namespace swarmot {

// Reference 3-agent, 10-waypoint matching instance with a known unique
// optimum: assignment {0 -> 7, 1 -> 4, 2 -> 9} at aggregate utility 50.
const Matrix& case_study_gamma();
const Matrix& case_study_delta();
// gamma + delta, the matrix an assignment's utility is read from.
const Matrix& case_study_aggregated();
UtilityParams case_study_params();
const Assignment& case_study_expected_assignment();
double case_study_expected_utility();

}  // namespace swarmot
