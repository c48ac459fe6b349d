#include "gen/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "gen/errors.hpp"
#include "gen/rng.hpp"

namespace gen {

void write_text_atomic(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

void append_double(std::string& out, double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  out.append(buf, ptr);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(sep);
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

// Lines without their terminators; a trailing newline does not add a line.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

}  // namespace

std::string format_embeddings(const EmbeddingTable& table) {
  std::string out = "# nodes=" + std::to_string(table.num_nodes()) +
                    " dim=" + std::to_string(table.dimension()) + "\n";
  out.reserve(out.size() + table.num_nodes() * (table.dimension() * 12 + 16));
  for (std::size_t i = 0; i < table.num_nodes(); ++i) {
    out += std::to_string(table.nodes()[i]);
    for (double x : table.row_at(i)) {
      out += '\t';
      append_double(out, x);
    }
    out += '\n';
  }
  return out;
}

EmbeddingTable parse_embeddings(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw FormatError(1, "missing '# nodes=<N> dim=<D>' header");
  std::size_t nodes = 0, dim = 0;
  {
    std::istringstream header{std::string(lines[0])};
    std::string hash, n_tok, d_tok, extra;
    header >> hash >> n_tok >> d_tok;
    const bool ok = hash == "#" && n_tok.rfind("nodes=", 0) == 0 && d_tok.rfind("dim=", 0) == 0 &&
                    parse_number(std::string_view(n_tok).substr(6), nodes) &&
                    parse_number(std::string_view(d_tok).substr(4), dim) && !(header >> extra);
    if (!ok) throw FormatError(1, "malformed header, expected '# nodes=<N> dim=<D>'");
  }
  if (lines.size() - 1 != nodes) {
    throw FormatError(std::min(lines.size(), nodes + 1) + 1,
                      "header declares " + std::to_string(nodes) + " nodes but the file has " +
                          std::to_string(lines.size() - 1) + " rows");
  }
  std::vector<NodeId> ids(nodes);
  std::vector<double> values;
  values.reserve(nodes * dim);
  for (std::size_t i = 0; i < nodes; ++i) {
    const std::size_t line_no = i + 2;
    const auto fields = split(lines[i + 1], '\t');
    if (fields.size() != dim + 1) {
      throw FormatError(line_no, "expected " + std::to_string(dim + 1) + " fields, found " +
                                     std::to_string(fields.size()));
    }
    if (!parse_number(fields[0], ids[i])) throw FormatError(line_no, "invalid node id");
    for (std::size_t c = 0; c < dim; ++c) {
      double x = 0.0;
      if (!parse_number(fields[c + 1], x)) {
        throw FormatError(line_no, "invalid value in column " + std::to_string(c + 2));
      }
      values.push_back(x);
    }
  }
  EmbeddingTable table(std::move(ids), dim);
  for (std::size_t i = 0; i < nodes; ++i) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(i * dim), dim, table.row_at(i).begin());
  }
  return table;
}

void write_embeddings(const EmbeddingTable& table, const std::string& path) {
  write_text_atomic(path, format_embeddings(table));
}

EmbeddingTable read_embeddings(const std::string& path) { return parse_embeddings(read_text(path)); }

std::string format_history(const RunHistory& history) {
  std::string out = "generation\tbest_loss\tmean_loss\tdelta_Lc\n";
  for (const auto& r : history) {
    out += std::to_string(r.generation);
    for (double x : {r.best_loss, r.mean_loss, r.generation == 1 ? 0.0 : r.delta_proximity}) {
      out += '\t';
      append_double(out, x);
    }
    out += '\n';
  }
  return out;
}

RunHistory parse_history(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "generation\tbest_loss\tmean_loss\tdelta_Lc") {
    throw FormatError(1, "missing history header");
  }
  RunHistory out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], '\t');
    HistoryRecord r;
    if (fields.size() != 4 || !parse_number(fields[0], r.generation) ||
        !parse_number(fields[1], r.best_loss) || !parse_number(fields[2], r.mean_loss) ||
        !parse_number(fields[3], r.delta_proximity)) {
      throw FormatError(i + 1, "expected integer and three floats");
    }
    out.push_back(r);
  }
  return out;
}

void write_history(const RunHistory& history, const std::string& path) {
  if (history.empty()) throw ConfigError("cannot write an empty history");
  write_text_atomic(path, format_history(history));
}

std::string format_metrics(const MetricsFile& metrics) {
  std::string out;
  for (const auto& [k, v] : metrics) out += k + '\t' + v + '\n';
  return out;
}

MetricsFile parse_metrics(std::string_view text) {
  MetricsFile out;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto tab = lines[i].find('\t');
    if (tab == std::string_view::npos) throw FormatError(i + 1, "expected 'key<TAB>value'");
    out.emplace_back(std::string(lines[i].substr(0, tab)), std::string(lines[i].substr(tab + 1)));
  }
  return out;
}

std::string format_pool(const Pool& pool) {
  std::string out = "# pool=" + std::to_string(pool.size()) +
                    " size=" + std::to_string(pool.sub_network_size()) + "\n";
  for (std::size_t t = 0; t < pool.size(); ++t) {
    out += std::to_string(t);
    for (NodeId id : pool[t].local_to_global) out += '\t' + std::to_string(id);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tabular data

std::vector<LabeledRow> TabularDataset::rows(const std::vector<std::size_t>& indices) const {
  std::vector<LabeledRow> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back({features.row(i), labels[i]});
  return out;
}

namespace {

// Adds units to the entries with the largest fractional quotas until `target`
// is reached; ties go to the lower class index. `cap` bounds each entry.
std::vector<std::size_t> largest_remainder(const std::vector<double>& quotas, std::size_t target,
                                           const std::vector<std::size_t>& cap) {
  std::vector<std::size_t> out(quotas.size());
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < quotas.size(); ++c) {
    out[c] = std::min(cap[c], static_cast<std::size_t>(std::floor(quotas[c])));
    assigned += out[c];
  }
  std::vector<std::size_t> order(quotas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return quotas[a] - std::floor(quotas[a]) > quotas[b] - std::floor(quotas[b]);
  });
  while (assigned < target) {
    bool progressed = false;
    for (std::size_t c : order) {
      if (assigned == target) break;
      if (out[c] < cap[c]) {
        ++out[c];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  return out;
}

}  // namespace

SplitCounts stratified_counts(const std::vector<std::size_t>& class_sizes) {
  const std::size_t n = std::accumulate(class_sizes.begin(), class_sizes.end(), std::size_t{0});
  const std::size_t k = class_sizes.size();
  const auto train_total = static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(n)));
  const auto val_total = static_cast<std::size_t>(std::floor(0.15 * static_cast<double>(n)));

  std::vector<double> quota(k);
  for (std::size_t c = 0; c < k; ++c) quota[c] = 0.7 * static_cast<double>(class_sizes[c]);
  SplitCounts s;
  s.train = largest_remainder(quota, train_total, class_sizes);
  for (std::size_t c = 0; c < k; ++c) {
    if (s.train[c] > 0 || class_sizes[c] == 0) continue;
    const auto donor = std::max_element(s.train.begin(), s.train.end()) - s.train.begin();
    if (s.train[static_cast<std::size_t>(donor)] <= 1) break;
    --s.train[static_cast<std::size_t>(donor)];
    s.train[c] = 1;
  }

  std::vector<std::size_t> remaining(k);
  for (std::size_t c = 0; c < k; ++c) {
    remaining[c] = class_sizes[c] - s.train[c];
    quota[c] = 0.15 * static_cast<double>(class_sizes[c]);
  }
  s.validation = largest_remainder(quota, val_total, remaining);
  s.test.resize(k);
  for (std::size_t c = 0; c < k; ++c) s.test[c] = remaining[c] - s.validation[c];
  return s;
}

TabularDataset parse_tabular_csv(std::string_view text, std::uint64_t split_seed) {
  const auto lines = lines_of(text);
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;
  std::unordered_map<std::string, std::size_t> class_index;
  std::size_t width = 0;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, ',');
    if (fields.size() < 2) throw ParseError(line_no, "need at least one feature and a label");
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ParseError(line_no, "row has " + std::to_string(fields.size()) + " columns, expected " +
                                    std::to_string(width));
    }
    std::vector<double> row(width - 1);
    for (std::size_t c = 0; c + 1 < width; ++c) {
      if (!parse_number(trim(fields[c]), row[c]) || !std::isfinite(row[c])) {
        throw ParseError(line_no, "non-numeric feature in column " + std::to_string(c + 1));
      }
    }
    const std::string label(trim(fields.back()));
    if (label.empty()) throw ParseError(line_no, "empty label");
    auto [it, inserted] = class_index.emplace(label, class_names.size());
    if (inserted) class_names.push_back(label);
    labels.push_back(it->second);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(lines.size() + 1, "no data rows");

  TabularDataset ds;
  ds.labels = std::move(labels);
  ds.class_names = std::move(class_names);

  std::vector<std::vector<std::size_t>> by_class(ds.num_classes());
  for (std::size_t i = 0; i < rows.size(); ++i) by_class[ds.labels[i]].push_back(i);
  std::vector<std::size_t> sizes;
  for (const auto& members : by_class) sizes.push_back(members.size());
  const SplitCounts counts = stratified_counts(sizes);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    Rng rng = make_stream(split_seed, Stream::kSplit, {c});
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[uniform_index(rng, i)]);
    }
    auto it = members.begin();
    ds.train.insert(ds.train.end(), it, it + static_cast<std::ptrdiff_t>(counts.train[c]));
    it += static_cast<std::ptrdiff_t>(counts.train[c]);
    ds.validation.insert(ds.validation.end(), it, it + static_cast<std::ptrdiff_t>(counts.validation[c]));
    it += static_cast<std::ptrdiff_t>(counts.validation[c]);
    ds.test.insert(ds.test.end(), it, members.end());
  }
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.validation.begin(), ds.validation.end());
  std::sort(ds.test.begin(), ds.test.end());

  const std::size_t cols = width - 1;
  std::vector<double> lo(cols, std::numeric_limits<double>::infinity());
  std::vector<double> hi(cols, -std::numeric_limits<double>::infinity());
  for (std::size_t i : ds.train) {
    for (std::size_t c = 0; c < cols; ++c) {
      lo[c] = std::min(lo[c], rows[i][c]);
      hi[c] = std::max(hi[c], rows[i][c]);
    }
  }
  ds.features = Matrix(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double range = hi[c] - lo[c];
      ds.features(i, c) = range > 0.0 ? (rows[i][c] - lo[c]) / range : 0.0;
    }
  }
  return ds;
}

TabularDataset load_tabular_csv(const std::string& path, std::uint64_t split_seed) {
  return parse_tabular_csv(read_text(path), split_seed);
}

}  // namespace gen
