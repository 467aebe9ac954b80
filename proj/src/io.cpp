#include "selfrep/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace selfrep {

namespace {

std::vector<std::vector<double>> real_rows(const ComplexMatrix& m, bool imag) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto& row = rows[static_cast<std::size_t>(r)];
    row.resize(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row[static_cast<std::size_t>(c)] = imag ? m(r, c).imag() : m(r, c).real();
    }
  }
  return rows;
}

ComplexMatrix complex_from(const Json& re, const Json& im, const char* what) {
  if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty()) {
    throw io_error(std::string(what) + ": re/im must be equal-shaped arrays");
  }
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = static_cast<Eigen::Index>(re[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& rr = re[static_cast<std::size_t>(r)];
    const auto& ri = im[static_cast<std::size_t>(r)];
    if (!rr.is_array() || static_cast<Eigen::Index>(rr.size()) != cols ||
        !ri.is_array() || static_cast<Eigen::Index>(ri.size()) != cols) {
      throw io_error(std::string(what) + ": ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = std::complex<double>(rr[static_cast<std::size_t>(c)].get<double>(),
                                     ri[static_cast<std::size_t>(c)].get<double>());
    }
  }
  return m;
}

}  // namespace

Json to_json(const ProbVec& p) {
  return Json{{"kind", "prob"}, {"dims", std::vector<std::size_t>{p.dim()}}, {"weights", p.weights()}};
}

Json to_json(const JointProb& p) {
  return Json{{"kind", "prob"}, {"dims", p.subsystem_dims()}, {"weights", p.flat().weights()}};
}

Json to_json(const DensityMatrix& rho) {
  return Json{{"kind", "density"},
              {"dim", rho.dim()},
              {"re", real_rows(rho.entries(), false)},
              {"im", real_rows(rho.entries(), true)}};
}

Json to_json(const StochasticChannel& m) {
  std::vector<std::vector<double>> rows(m.out_dim());
  for (std::size_t r = 0; r < m.out_dim(); ++r) {
    rows[r].resize(m.in_dim());
    for (std::size_t c = 0; c < m.in_dim(); ++c) {
      rows[r][c] = m.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return Json{{"kind", "stochastic"}, {"in_dim", m.in_dim()}, {"out_dim", m.out_dim()}, {"matrix", rows}};
}

Json to_json(const KrausChannel& k) {
  Json ops = Json::array();
  for (const auto& op : k.kraus_ops()) {
    ops.push_back(Json{{"re", real_rows(op, false)}, {"im", real_rows(op, true)}});
  }
  return Json{{"kind", "kraus"}, {"in_dim", k.in_dim()}, {"out_dim", k.out_dim()}, {"ops", ops}};
}

LoadedState state_from_json(const Json& j) {
  try {
    if (!j.is_object() || !j.contains("kind")) throw io_error("state: missing kind");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "prob") {
      auto dims = j.at("dims").get<std::vector<std::size_t>>();
      auto weights = j.at("weights").get<std::vector<double>>();
      return LoadedState{JointProb(std::move(weights), std::move(dims))};
    }
    if (kind == "density") {
      auto dim = j.at("dim").get<std::size_t>();
      ComplexMatrix m = complex_from(j.at("re"), j.at("im"), "density");
      if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim) {
        throw io_error("density: dim does not match matrix shape");
      }
      return LoadedState{DensityMatrix(std::move(m))};
    }
    throw io_error("state: unknown kind '" + kind + "'");
  } catch (const io_error&) {
    throw;
  } catch (const std::exception& e) {
    throw io_error(std::string("state: ") + e.what());
  }
}

LoadedChannel channel_from_json(const Json& j) {
  try {
    if (!j.is_object() || !j.contains("kind")) throw io_error("channel: missing kind");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "stochastic") {
      auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
      const auto out_dim = j.at("out_dim").get<std::size_t>();
      const auto in_dim = j.at("in_dim").get<std::size_t>();
      if (rows.size() != out_dim) throw io_error("stochastic: row count != out_dim");
      Eigen::MatrixXd m(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim));
      for (std::size_t r = 0; r < out_dim; ++r) {
        if (rows[r].size() != in_dim) throw io_error("stochastic: ragged rows");
        for (std::size_t c = 0; c < in_dim; ++c) {
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
      }
      return StochasticChannel(std::move(m));
    }
    if (kind == "kraus") {
      const auto out_dim = j.at("out_dim").get<std::size_t>();
      const auto in_dim = j.at("in_dim").get<std::size_t>();
      std::vector<ComplexMatrix> ops;
      for (const auto& op : j.at("ops")) {
        ComplexMatrix m = complex_from(op.at("re"), op.at("im"), "kraus");
        if (static_cast<std::size_t>(m.rows()) != out_dim ||
            static_cast<std::size_t>(m.cols()) != in_dim) {
          throw io_error("kraus: operator shape mismatch");
        }
        ops.push_back(std::move(m));
      }
      return KrausChannel(std::move(ops));
    }
    throw io_error("channel: unknown kind '" + kind + "'");
  } catch (const io_error&) {
    throw;
  } catch (const std::exception& e) {
    throw io_error(std::string("channel: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw io_error(path + ": " + e.what());
  }
  return j;
}

LoadedState load_state(const std::string& path) { return state_from_json(read_json_file(path)); }

LoadedChannel load_channel(const std::string& path) {
  return channel_from_json(read_json_file(path));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out << content;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::uint64_t h = 14695981039346656037ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace selfrep
