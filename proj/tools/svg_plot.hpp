#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace acsens::tools {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct Marker {
    std::string name;
    double x = 0.0;
    double y = 0.0;
    std::string color = "red";
    bool square = false;
};

struct Plot {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
    std::vector<Marker> markers;
    /// Embedded as an XML comment.
    nlohmann::json config = nlohmann::json::object();
};

/// Polylines with axes, ticks, point markers and a legend.
std::string render_svg(const Plot& plot);

}  // namespace acsens::tools
