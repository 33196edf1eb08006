#include "bsaomp/serialization.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace bsaomp {

namespace {

class FormatGuard {
 public:
  explicit FormatGuard(std::ostream& os) : os_(os), flags_(os.flags()), precision_(os.precision()) {
    os_ << std::setprecision(17);
  }
  ~FormatGuard() {
    os_.flags(flags_);
    os_.precision(precision_);
  }
  FormatGuard(const FormatGuard&) = delete;
  FormatGuard& operator=(const FormatGuard&) = delete;

 private:
  std::ostream& os_;
  std::ios::fmtflags flags_;
  std::streamsize precision_;
};

void expect(std::istream& is, const std::string& word) {
  std::string got;
  if (!(is >> got) || got != word) {
    throw std::runtime_error("fixture parse error: expected '" + word + "', got '" + got + "'");
  }
}

template <typename T>
T read_value(std::istream& is, const char* what) {
  T v{};
  if (!(is >> v)) {
    throw std::runtime_error(std::string("fixture parse error: bad ") + what);
  }
  return v;
}

cplx read_complex(std::istream& is) {
  const double re = read_value<double>(is, "real part");
  const double im = read_value<double>(is, "imaginary part");
  return {re, im};
}

}  // namespace

void write_path_set(std::ostream& os, const PathSet& paths) {
  FormatGuard guard(os);
  os << "bsaomp-pathset 1\n";
  os << "users " << paths.num_users() << '\n';
  for (int k = 0; k < paths.num_users(); ++k) {
    const auto& user = paths.user(k);
    os << "user " << k << " paths " << user.size() << '\n';
    for (const auto& p : user) {
      os << "path " << p.doa.value() << ' ' << p.dod.value() << ' ' << p.gain.real() << ' '
         << p.gain.imag() << ' ' << p.delay_s << ' ' << p.doa_index << ' ' << p.dod_index << '\n';
    }
  }
}

PathSet read_path_set(std::istream& is) {
  expect(is, "bsaomp-pathset");
  expect(is, "1");
  expect(is, "users");
  const int K = read_value<int>(is, "user count");
  PathSet set;
  set.users.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    expect(is, "user");
    read_value<int>(is, "user index");
    expect(is, "paths");
    const int L = read_value<int>(is, "path count");
    for (int l = 0; l < L; ++l) {
      expect(is, "path");
      Path p;
      p.doa = PhysicalDirection(read_value<double>(is, "doa"));
      p.dod = PhysicalDirection(read_value<double>(is, "dod"));
      p.gain = read_complex(is);
      p.delay_s = read_value<double>(is, "delay");
      p.doa_index = read_value<int>(is, "doa index");
      p.dod_index = read_value<int>(is, "dod index");
      set.users[static_cast<std::size_t>(k)].push_back(p);
    }
  }
  return set;
}

void write_channel(std::ostream& os, const WidebandChannel& channel) {
  FormatGuard guard(os);
  const Index rows = channel.num_subcarriers() > 0 ? channel[0].rows() : 0;
  const Index cols = channel.num_subcarriers() > 0 ? channel[0].cols() : 0;
  os << "bsaomp-channel 1\n";
  os << "subcarriers " << channel.num_subcarriers() << " rows " << rows << " cols " << cols << '\n';
  for (int m = 0; m < channel.num_subcarriers(); ++m) {
    os << "subcarrier " << m << '\n';
    const CMatrix& H = channel[m];
    for (Index i = 0; i < H.rows(); ++i) {
      for (Index j = 0; j < H.cols(); ++j) {
        os << (j ? " " : "") << H(i, j).real() << ' ' << H(i, j).imag();
      }
      os << '\n';
    }
  }
}

WidebandChannel read_channel(std::istream& is) {
  expect(is, "bsaomp-channel");
  expect(is, "1");
  expect(is, "subcarriers");
  const int M = read_value<int>(is, "subcarrier count");
  expect(is, "rows");
  const Index rows = read_value<Index>(is, "rows");
  expect(is, "cols");
  const Index cols = read_value<Index>(is, "cols");
  WidebandChannel ch;
  for (int m = 0; m < M; ++m) {
    expect(is, "subcarrier");
    read_value<int>(is, "subcarrier index");
    CMatrix H(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        H(i, j) = read_complex(is);
      }
    }
    ch.subcarriers.push_back(std::move(H));
  }
  return ch;
}

void write_measurements(std::ostream& os, const MeasurementBundle& bundle) {
  FormatGuard guard(os);
  const Index n = bundle.num_subcarriers() > 0 ? bundle.y.front().size() : 0;
  os << "bsaomp-measurements 1\n";
  os << "snr_db " << bundle.snr_db << " noise_variance " << bundle.noise_variance << " subcarriers "
     << bundle.num_subcarriers() << " length " << n << '\n';
  for (int m = 0; m < bundle.num_subcarriers(); ++m) {
    os << "subcarrier " << m << '\n';
    for (const auto& v : bundle.y[static_cast<std::size_t>(m)]) {
      os << v.real() << ' ' << v.imag() << '\n';
    }
  }
}

MeasurementBundle read_measurements(std::istream& is) {
  expect(is, "bsaomp-measurements");
  expect(is, "1");
  MeasurementBundle b;
  expect(is, "snr_db");
  std::string snr;
  is >> snr;
  b.snr_db = std::stod(snr);
  expect(is, "noise_variance");
  b.noise_variance = read_value<double>(is, "noise variance");
  expect(is, "subcarriers");
  const int M = read_value<int>(is, "subcarrier count");
  expect(is, "length");
  const Index n = read_value<Index>(is, "length");
  for (int m = 0; m < M; ++m) {
    expect(is, "subcarrier");
    read_value<int>(is, "subcarrier index");
    CVector y(n);
    for (Index i = 0; i < n; ++i) {
      y(i) = read_complex(is);
    }
    b.y.push_back(std::move(y));
  }
  return b;
}

}  // namespace bsaomp
