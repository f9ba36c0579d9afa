#pragma once

// End-to-end exit-status matrix for the command-line tool: every command
// against its success, failure, input-error and usage-error outcomes, run by
// spawning the built binary.

#include <string>
#include <vector>

namespace testing_support {

struct MatrixCell {
    std::string name;  // "command / outcome"
    int expected = 0;
    int actual = -1;
    std::string detail;  // extra failure information, empty when fine

    bool ok() const { return expected == actual && detail.empty(); }
};

std::vector<MatrixCell> run_cli_matrix();

}  // namespace testing_support
