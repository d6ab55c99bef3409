#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtseq/design.hpp"

namespace gtseq {

struct Cell {
    double value = 0.0;
    /// Decimals in the text layout; negative prints the integer value.
    int decimals = 2;
    /// Set for label cells; text then replaces the number in both layouts.
    bool is_text = false;
    std::string text;
};

struct Table {
    int id = 0;
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> notes;
};

struct TableRequest {
    int id = 1;
    DesignParams design;
    long long replicates = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Builds one of the seven tables. Tables 3, 4, 6 and 7 include simulated
/// rows with Monte Carlo standard-error columns. A design other than
/// alpha = 0.05, gamma = 0.1 is labelled as an extrapolation.
Table make_table(const TableRequest& req);

std::string render_text(const Table& t);
std::string render_csv(const Table& t);

}  // namespace gtseq
