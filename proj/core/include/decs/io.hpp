#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decs/model.hpp"

namespace decs::io {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Strict double parse of a whole field; nullopt if it is not a number.
std::optional<double> parse_double(std::string_view field);

// Dataset CSV: one observation per row, optional header row of variable
// names. The header is detected by the first row containing a non-numeric
// field.
model::Dataset parse_dataset_csv(std::istream& in);
model::Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const model::Dataset& data);
void write_dataset_csv(const std::filesystem::path& path, const model::Dataset& data);

// Headerless dense matrix CSV. A matrix with zero columns is written as one
// empty line per row.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// One line of an edge-list TSV before endpoints are resolved to node ids.
struct RawEdge {
  std::string source;
  std::string target;
  double weight = 1.0;
};

/// Parses `source<TAB>target<TAB>weight` lines after the mandatory header.
/// The weight column may be omitted (weight 1).
std::vector<RawEdge> parse_edge_list(std::istream& in);
std::vector<RawEdge> read_edge_list(const std::filesystem::path& path);

/// Resolves endpoints (1-based ids or names from `names`) into a p x p
/// adjacency. When `dim` is unset it is names.size() if names are given, else
/// the largest id seen.
model::WeightedAdjacency resolve_edges(const std::vector<RawEdge>& edges,
                                       std::optional<int> dim,
                                       const std::vector<std::string>& names = {});

/// Writes edges with |w| > threshold, row-major order, 1-based ids unless
/// names are supplied.
void write_edge_list(std::ostream& out, const model::WeightedAdjacency& w, double threshold = 0.0,
                     const std::vector<std::string>& names = {});
void write_edge_list(const std::filesystem::path& path, const model::WeightedAdjacency& w,
                     double threshold = 0.0, const std::vector<std::string>& names = {});

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view text);

/// Reads the whole file; throws InvalidInput if it cannot be opened.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace decs::io
