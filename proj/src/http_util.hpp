#pragma once

#include <string>

#include "semtower/errors.hpp"

namespace semtower::detail {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // leading slash, "/" when absent
};

inline SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw TransportError(url, "malformed URL (expected http://host[:port][/path])");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace semtower::detail
