#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cnr::cli {

class FetchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// GETs an http(s) URL, following at most 5 redirects, and returns the body
/// transcoded to UTF-8.
std::string fetch_url(const std::string& url, int timeout_seconds);

/// charset parameter of a Content-Type header value, lowercased.
std::optional<std::string> charset_from_content_type(std::string_view content_type);

/// charset declared by a <meta> tag within the first 4 KiB of the document.
std::optional<std::string> sniff_meta_charset(std::string_view html);

/// Converts `bytes` from `charset` to UTF-8. Unknown charsets and
/// conversion failures return the input unchanged (decoded later as lossy
/// UTF-8).
std::string to_utf8(std::string bytes, const std::string& charset);

} // namespace cnr::cli
