#include "swarmot/case_study.hpp"

namespace swarmot {
namespace {

Matrix from_rows(const double (&rows)[3][10]) {
    Matrix m(3, 10);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 10; ++c) m(r, c) = rows[r][c];
    return m;
}

const double kDelta[3][10] = {
    {5, 4, 2, 6, 3, 7, 2, 10, 9, 1},
    {8, 2, 4, 5, 9, 5, 2, 4, 9, 2},
    {1, 1, 4, 7, 1, 6, 9, 7, 1, 9},
};

const double kAggregated[3][10] = {
    {6, 10, 9, 14, 6, 12, 5, 17, 14, 3},
    {13, 9, 13, 15, 17, 15, 4, 7, 10, 8},
    {11, 5, 5, 15, 3, 9, 10, 10, 7, 16},
};

}  // namespace

const Matrix& case_study_delta() {
    static const Matrix m = from_rows(kDelta);
    return m;
}

const Matrix& case_study_aggregated() {
    static const Matrix m = from_rows(kAggregated);
    return m;
}

const Matrix& case_study_gamma() {
    static const Matrix m = [] {
        Matrix g(3, 10);
        const Matrix& agg = case_study_aggregated();
        const Matrix& d = case_study_delta();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 10; ++c) g(r, c) = agg(r, c) - d(r, c);
        return g;
    }();
    return m;
}

UtilityParams case_study_params() { return {case_study_gamma(), case_study_delta()}; }

const Assignment& case_study_expected_assignment() {
    static const Assignment a = [] {
        Assignment out;
        out.pairs = {{0, 7}, {1, 4}, {2, 9}};
        return out;
    }();
    return a;
}

double case_study_expected_utility() { return 50.0; }

}  // namespace swarmot
