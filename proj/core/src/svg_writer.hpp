#pragma once

#include <string>

#include "text_util.hpp"

namespace datamech::detail {

// Buffered SVG 1.1 document builder. All coordinates are written with three
// decimals so output bytes are stable across platforms.
class SvgWriter {
public:
    SvgWriter(double width, double height) {
        buf_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        buf_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_fixed3(width) +
                "\" height=\"" + format_fixed3(height) + "\" viewBox=\"0 0 " +
                format_fixed3(width) + " " + format_fixed3(height) + "\">\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& cls = {}) {
        buf_ += "<rect";
        if (!cls.empty()) buf_ += " class=\"" + cls + "\"";
        buf_ += " x=\"" + format_fixed3(x) + "\" y=\"" + format_fixed3(y) + "\" width=\"" +
                format_fixed3(w) + "\" height=\"" + format_fixed3(h) + "\" fill=\"" + fill +
                "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width, const std::string& cls = {}) {
        buf_ += "<line";
        if (!cls.empty()) buf_ += " class=\"" + cls + "\"";
        buf_ += " x1=\"" + format_fixed3(x1) + "\" y1=\"" + format_fixed3(y1) + "\" x2=\"" +
                format_fixed3(x2) + "\" y2=\"" + format_fixed3(y2) + "\" stroke=\"" + stroke +
                "\" stroke-width=\"" + format_fixed3(width) + "\"/>\n";
    }

    void path(const std::string& d, const std::string& stroke, double width,
              const std::string& cls = {}) {
        buf_ += "<path";
        if (!cls.empty()) buf_ += " class=\"" + cls + "\"";
        buf_ += " d=\"" + d + "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
                format_fixed3(width) + "\"/>\n";
    }

    void text(double x, double y, const std::string& content, double size,
              const std::string& fill = "#000000", const std::string& anchor = "start",
              const std::string& cls = {}, const std::string& transform = {}) {
        buf_ += "<text";
        if (!cls.empty()) buf_ += " class=\"" + cls + "\"";
        buf_ += " x=\"" + format_fixed3(x) + "\" y=\"" + format_fixed3(y) + "\" font-size=\"" +
                format_fixed3(size) + "\" font-family=\"monospace\" fill=\"" + fill +
                "\" text-anchor=\"" + anchor + "\"";
        if (!transform.empty()) buf_ += " transform=\"" + transform + "\"";
        buf_ += ">" + escape(content) + "</text>\n";
    }

    std::string finish() {
        buf_ += "</svg>\n";
        return std::move(buf_);
    }

    static std::string escape(const std::string& s) {
        std::string out;
        out.reserve(s.size());
        for (char c : s) {
            switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
            }
        }
        return out;
    }

private:
    std::string buf_;
};

} // namespace datamech::detail
