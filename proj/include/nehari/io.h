#pragma once

#include "nehari/solver.h"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nehari {

using json = nlohmann::json;

/// "%.17g"; non-finite values become the JSON literal null.
std::string format_double(double x);

/// Pretty JSON with every floating-point number written with 17 significant
/// digits, so identical inputs give byte-identical files.
void write_json(std::ostream& os, const json& j);
std::string dump_json(const json& j);
void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

json to_json(const ThresholdReport& r);
json to_json(const FiberingAnalysis& fa);
json to_json(const SolveReport& r);
json to_json(const std::vector<CheckResult>& checks);

/// CSV with header; one row per interior node:
///   1D: i,x,value        2D: i,j,x,y,value
void write_field_csv(std::ostream& os, const Field& w);
Field read_field_csv(std::istream& is, const Grid& grid);

/// Same layout with two value columns u,v.
void write_pair_csv(std::ostream& os, const Pair& p);
Pair read_pair_csv(std::istream& is, const Grid& grid);

void write_pair_csv_file(const std::filesystem::path& path, const Pair& p);
Pair read_pair_csv_file(const std::filesystem::path& path, const Grid& grid);
Field read_field_csv_file(const std::filesystem::path& path, const Grid& grid);

}  // namespace nehari
