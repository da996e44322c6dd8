#ifndef TVGM_IO_HPP
#define TVGM_IO_HPP

#include "tvgm/data_model.hpp"
#include "tvgm/graph_props.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tvgm {

enum class Layout { automatic, paired, multi_subject };

using AnyDataset = std::variant<PairedDataset, MultiSubjectDataset>;

// Delimited text (comma or tab, detected from the header), header row,
// column 0 = time index, then x1..xd, y1..yd (paired) or s<l>_1..s<l>_d
// (multi-subject). Out-of-range time indices are mapped onto [0, 1].
AnyDataset load_dataset(std::istream& in, Layout layout = Layout::automatic);
AnyDataset load_dataset_file(const std::string& path, Layout layout = Layout::automatic);
PairedDataset load_paired_file(const std::string& path);

void write_dataset(std::ostream& out, const PairedDataset& ds);
void write_dataset(std::ostream& out, const MultiSubjectDataset& ds);

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

// One "j k" pair per line, 1-based. Lines starting with '#' are ignored.
void write_edge_list(std::ostream& out, const EdgeSet& es);
EdgeSet read_edge_list(std::istream& in, int d);

// Several edge lists in one file, each introduced by a "# z=<value>" line.
void write_edge_lists(std::ostream& out, const std::vector<double>& z,
                      const std::vector<EdgeSet>& sets);
std::vector<std::pair<double, EdgeSet>> read_edge_lists(std::istream& in, int d);

// Single numeric column with a header line.
void write_column(std::ostream& out, const std::string& header,
                  const std::vector<double>& values);
std::vector<double> read_column(std::istream& in);

std::string format_double(double v);

}  // namespace tvgm

#endif  // TVGM_IO_HPP
