#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "kerrmech/harness.hpp"

namespace kerrmech {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("read_records_csv: bad number '" + s + "'");
  }
  return v;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

Stability parse_stability(const std::string& s) {
  for (Stability v : {Stability::Stable, Stability::UnstableC1, Stability::UnstableC2}) {
    if (s == to_string(v)) return v;
  }
  throw std::runtime_error("read_records_csv: bad stability '" + s + "'");
}

Region parse_region(const std::string& s) {
  for (Region v : {Region::I, Region::II, Region::III, Region::IV}) {
    if (s == to_string(v)) return v;
  }
  throw std::runtime_error("read_records_csv: bad region '" + s + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << kCsvHeader << '\n';
  for (const SweepRecord& r : records) {
    os << format_double(r.y) << ',' << format_double(r.z) << ',' << format_double(r.chi) << ','
       << format_double(r.sideband) << ',' << format_double(r.q_m) << ',' << format_double(r.n_th);
    for (const auto& l : r.lam) os << ',' << opt(l);
    for (const auto& s : r.stab) os << ',' << (s ? to_string(*s) : "");
    os << ',' << to_string(r.region);
    if (r.quantum) {
      const QuantumBlock& q = *r.quantum;
      os << ',' << format_double(q.photon_number) << ',' << format_double(q.amp_sq) << ','
         << opt(q.g2) << ',' << opt(q.fidelity_vs_kerr) << ',' << q.dims.n_a << ',' << q.dims.n_b
         << ',' << format_double(q.residual);
    } else {
      os << ",,,,,,,";
    }
    os << '\n';
  }
}

void write_records_json(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "[";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SweepRecord& r = records[i];
    os << (i ? ",\n " : "\n ") << "{\"y\": " << json_number(r.y) << ", \"z\": " << json_number(r.z)
       << ", \"chi\": " << json_number(r.chi) << ", \"sideband\": " << json_number(r.sideband)
       << ", \"q_m\": " << json_number(r.q_m) << ", \"n_th\": " << json_number(r.n_th)
       << ", \"roots\": [";
    for (int k = 0; k < 3; ++k) {
      os << (k ? ", " : "");
      if (r.lam[k]) {
        os << "{\"lam\": " << json_number(*r.lam[k]) << ", \"stability\": \""
           << to_string(*r.stab[k]) << "\"}";
      } else {
        os << "null";
      }
    }
    os << "], \"region\": \"" << to_string(r.region) << "\", \"quantum\": ";
    if (r.quantum) {
      const QuantumBlock& q = *r.quantum;
      auto o = [](const std::optional<double>& v) { return v ? json_number(*v) : "null"; };
      os << "{\"photon_number\": " << json_number(q.photon_number)
         << ", \"amp_sq\": " << json_number(q.amp_sq) << ", \"g2\": " << o(q.g2)
         << ", \"fidelity_vs_kerr\": " << o(q.fidelity_vs_kerr)
         << ", \"kerr_photon_number\": " << o(q.kerr_photon_number)
         << ", \"kerr_g2\": " << o(q.kerr_g2) << ", \"n_a\": " << q.dims.n_a
         << ", \"n_b\": " << q.dims.n_b << ", \"residual\": " << json_number(q.residual)
         << ", \"warnings\": [";
      for (std::size_t w = 0; w < q.warnings.size(); ++w) {
        os << (w ? ", " : "") << json_string(q.warnings[w]);
      }
      os << "]}";
    } else {
      os << "null";
    }
    if (r.quantum_error) os << ", \"quantum_error\": " << json_string(*r.quantum_error);
    os << "}";
  }
  os << (records.empty() ? "]\n" : "\n]\n");
}

void write_records(std::ostream& os, const std::vector<SweepRecord>& records, OutputFormat f) {
  if (f == OutputFormat::Csv) {
    write_records_csv(os, records);
  } else {
    write_records_json(os, records);
  }
}

std::vector<SweepRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || split_csv(line) != split_csv(kCsvHeader)) {
    throw std::runtime_error("read_records_csv: missing or unexpected header");
  }
  std::vector<SweepRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 20) throw std::runtime_error("read_records_csv: expected 20 fields");
    SweepRecord r;
    r.y = parse_double(f[0]);
    r.z = parse_double(f[1]);
    r.chi = parse_double(f[2]);
    r.sideband = parse_double(f[3]);
    r.q_m = parse_double(f[4]);
    r.n_th = parse_double(f[5]);
    for (int k = 0; k < 3; ++k) {
      r.lam[k] = parse_opt(f[6 + k]);
      if (!f[9 + k].empty()) r.stab[k] = parse_stability(f[9 + k]);
    }
    r.region = parse_region(f[12]);
    if (!f[13].empty()) {
      QuantumBlock q;
      q.photon_number = parse_double(f[13]);
      q.amp_sq = parse_double(f[14]);
      q.g2 = parse_opt(f[15]);
      q.fidelity_vs_kerr = parse_opt(f[16]);
      q.dims = FockConfig{static_cast<int>(parse_double(f[17])), static_cast<int>(parse_double(f[18]))};
      q.residual = parse_double(f[19]);
      r.quantum = std::move(q);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_wigner_csv(std::ostream& os, const WignerGrid& grid) {
  os << "re,im,w\n";
  for (std::size_t i = 0; i < grid.re_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.im_axis.size(); ++j) {
      os << format_double(grid.re_axis[i]) << ',' << format_double(grid.im_axis[j]) << ','
         << format_double(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
         << '\n';
    }
  }
}

void write_boundaries_csv(std::ostream& os, const std::vector<BoundaryCurve>& curves) {
  os << "curve,y,z\n";
  for (const BoundaryCurve& c : curves) {
    for (const auto& p : c.points) {
      os << c.name << ',' << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
    }
  }
}

void write_nc_surface(std::ostream& os, const std::vector<NcCell>& cells, OutputFormat f) {
  if (f == OutputFormat::Csv) {
    os << "sideband,q_m,chi_nc,ratio,status\n";
    for (const NcCell& c : cells) {
      auto v = [](double x) {
        if (std::isnan(x)) return std::string();
        return std::isinf(x) ? std::string("inf") : format_double(x);
      };
      os << format_double(c.sideband) << ',' << format_double(c.q_m) << ',' << v(c.chi_nc) << ','
         << v(c.ratio) << ',' << c.status << '\n';
    }
    return;
  }
  os << "[";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const NcCell& c = cells[i];
    os << (i ? ",\n " : "\n ") << "{\"sideband\": " << json_number(c.sideband)
       << ", \"q_m\": " << json_number(c.q_m) << ", \"chi_nc\": " << json_number(c.chi_nc)
       << ", \"ratio\": " << json_number(c.ratio) << ", \"status\": " << json_string(c.status) << "}";
  }
  os << (cells.empty() ? "]\n" : "\n]\n");
}

}  // namespace kerrmech
