#pragma once

#include <string>
#include <vector>

namespace gem::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string trim(const std::string& s);
std::vector<std::string> split_row(const std::string& line);
double to_double(const std::string& field);

// Reads a CSV with an optional non-numeric header row; '#' lines are skipped.
Table read_file(const std::string& path);

}  // namespace gem::csv
