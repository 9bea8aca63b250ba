#include "irml/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "irml/csv.hpp"
#include "irml/errors.hpp"

namespace irml {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Transform {
  // px = ox + sx * x ; py = oy + sy * (log_y ? log10(y) : y)
  double ox, sx, oy, sy;
  bool log_y;
  double to_px(double x) const { return ox + sx * x; }
  double to_py(double y) const {
    return oy + sy * (log_y ? std::log10(y) : y);
  }
  double from_px(double px) const { return (px - ox) / sx; }
  double from_py(double py) const {
    double v = (py - oy) / sy;
    return log_y ? std::pow(10.0, v) : v;
  }
};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void emit_svg_chart(const std::string& path,
                    const std::vector<SvgSeries>& series,
                    const SvgChartSpec& spec) {
  if (series.empty()) throw ComputeError("chart needs at least one series");
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (const SvgSeries& s : series) {
    if (s.x.size() != s.y.size())
      throw ComputeError("series x/y length mismatch: " + s.name);
    for (size_t i = 0; i < s.x.size(); ++i) {
      double y = s.y[i];
      if (spec.log_y && y <= 0)
        throw ComputeError("log-scale chart needs positive values");
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (first) throw ComputeError("chart has no points");
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  double lo = spec.log_y ? std::log10(ymin) : ymin;
  double hi = spec.log_y ? std::log10(ymax) : ymax;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double ml = 72, mr = 24, mt = 40, mb = 56;  // margins
  Transform tf;
  tf.log_y = spec.log_y;
  tf.ox = ml - (spec.width - ml - mr) / (xmax - xmin) * xmin;
  tf.sx = (spec.width - ml - mr) / (xmax - xmin);
  tf.sy = -(spec.height - mt - mb) / (hi - lo);
  tf.oy = (spec.height - mb) - tf.sy * lo;

  std::ostringstream out;
  out.setf(std::ios::fmtflags(0), std::ios::floatfield);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
      << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width
      << " " << spec.height << "\">\n";
  out << "<!-- transform ox=" << fmt_g17(tf.ox) << " sx=" << fmt_g17(tf.sx)
      << " oy=" << fmt_g17(tf.oy) << " sy=" << fmt_g17(tf.sy)
      << " log_y=" << (tf.log_y ? 1 : 0) << " -->\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << spec.width / 2 << "\" y=\"24\" text-anchor=\"middle\""
      << " font-family=\"sans-serif\" font-size=\"15\">" << esc(spec.title)
      << "</text>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << spec.height - mb << "\" x2=\""
      << spec.width - mr << "\" y2=\"" << spec.height - mb
      << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << spec.height - mb
      << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << (ml + spec.width - mr) / 2 << "\" y=\""
      << spec.height - 16 << "\" text-anchor=\"middle\""
      << " font-family=\"sans-serif\" font-size=\"12\">" << esc(spec.x_label)
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << (mt + spec.height - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"12\" transform=\"rotate(-90 18 "
      << (mt + spec.height - mb) / 2 << ")\">" << esc(spec.y_label)
      << "</text>\n";

  // ticks: 5 per axis
  for (int i = 0; i <= 4; ++i) {
    double x = xmin + (xmax - xmin) * i / 4.0;
    double px = tf.to_px(x);
    out << "<line x1=\"" << fmt_g17(px) << "\" y1=\"" << spec.height - mb
        << "\" x2=\"" << fmt_g17(px) << "\" y2=\"" << spec.height - mb + 5
        << "\" stroke=\"#333\"/>\n";
    std::ostringstream lbl;
    lbl.precision(4);
    lbl << x;
    out << "<text x=\"" << fmt_g17(px) << "\" y=\"" << spec.height - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"10\">" << lbl.str() << "</text>\n";
    double v = lo + (hi - lo) * i / 4.0;
    double y = spec.log_y ? std::pow(10.0, v) : v;
    double py = tf.oy + tf.sy * v;
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt_g17(py) << "\" x2=\""
        << ml << "\" y2=\"" << fmt_g17(py) << "\" stroke=\"#333\"/>\n";
    std::ostringstream ylbl;
    ylbl.precision(3);
    ylbl << y;
    out << "<text x=\"" << ml - 8 << "\" y=\"" << fmt_g17(py + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\""
        << " font-size=\"10\">" << ylbl.str() << "</text>\n";
  }

  // series
  for (size_t si = 0; si < series.size(); ++si) {
    const SvgSeries& s = series[si];
    const char* color = kPalette[si % 8];
    bool scatter = s.name.rfind("scatter:", 0) == 0;
    out << "<g data-series=\"" << esc(s.name) << "\">\n";
    if (!scatter && s.x.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.8\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (i) out << ' ';
        out << fmt_g17(tf.to_px(s.x[i])) << ',' << fmt_g17(tf.to_py(s.y[i]));
      }
      out << "\"/>\n";
    }
    for (size_t i = 0; i < s.x.size(); ++i)
      out << "<circle cx=\"" << fmt_g17(tf.to_px(s.x[i])) << "\" cy=\""
          << fmt_g17(tf.to_py(s.y[i])) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    out << "</g>\n";
    // legend entry
    double ly = mt + 16.0 * si;
    out << "<rect x=\"" << spec.width - mr - 150 << "\" y=\"" << ly - 9
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << spec.width - mr - 136 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write chart: " + path);
  f << out.str();
}

std::vector<SvgSeries> parse_svg_chart(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open chart: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  std::string text = ss.str();

  Transform tf{};
  {
    size_t p = text.find("<!-- transform ");
    if (p == std::string::npos) throw DataError("chart transform missing");
    size_t e = text.find("-->", p);
    std::istringstream ts(text.substr(p + 15, e - p - 15));
    std::string tok;
    int seen = 0;
    while (ts >> tok) {
      size_t eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::string k = tok.substr(0, eq);
      double v = std::stod(tok.substr(eq + 1));
      if (k == "ox") tf.ox = v, ++seen;
      else if (k == "sx") tf.sx = v, ++seen;
      else if (k == "oy") tf.oy = v, ++seen;
      else if (k == "sy") tf.sy = v, ++seen;
      else if (k == "log_y") tf.log_y = v != 0, ++seen;
    }
    if (seen != 5) throw DataError("chart transform incomplete");
  }

  std::vector<SvgSeries> out;
  size_t pos = 0;
  while ((pos = text.find("<g data-series=\"", pos)) != std::string::npos) {
    size_t nstart = pos + 16;
    size_t nend = text.find('"', nstart);
    SvgSeries s;
    s.name = text.substr(nstart, nend - nstart);
    // unescape the minimal set emitted by esc()
    for (const auto& [from, to] :
         std::vector<std::pair<std::string, std::string>>{
             {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}}) {
      size_t q = 0;
      while ((q = s.name.find(from, q)) != std::string::npos)
        s.name.replace(q, from.size(), to);
    }
    size_t gend = text.find("</g>", pos);
    std::string body = text.substr(pos, gend - pos);
    size_t pl = body.find("points=\"");
    if (pl != std::string::npos) {
      size_t pe = body.find('"', pl + 8);
      std::istringstream ps(body.substr(pl + 8, pe - pl - 8));
      std::string pt;
      while (ps >> pt) {
        size_t comma = pt.find(',');
        double px = std::stod(pt.substr(0, comma));
        double py = std::stod(pt.substr(comma + 1));
        s.x.push_back(tf.from_px(px));
        s.y.push_back(tf.from_py(py));
      }
    } else {
      size_t c = 0;
      while ((c = body.find("<circle cx=\"", c)) != std::string::npos) {
        size_t xe = body.find('"', c + 12);
        double px = std::stod(body.substr(c + 12, xe - c - 12));
        size_t cy = body.find("cy=\"", xe);
        size_t ye = body.find('"', cy + 4);
        double py = std::stod(body.substr(cy + 4, ye - cy - 4));
        s.x.push_back(tf.from_px(px));
        s.y.push_back(tf.from_py(py));
        c = ye;
      }
    }
    out.push_back(std::move(s));
    pos = gend;
  }
  return out;
}

}  // namespace irml
