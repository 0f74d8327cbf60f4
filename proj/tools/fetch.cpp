#include "fetch.hpp"

#include <iconv.h>

#include <cerrno>
#include <vector>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_REDIRECT_MAX_COUNT 5
#include <httplib.h>

#include "cnr/text.hpp"

namespace cnr::cli {

namespace {

std::optional<std::string> charset_after(std::string_view s, std::size_t from) {
    std::size_t i = from;
    while (i < s.size() && (s[i] == ' ' || s[i] == '=' || s[i] == '"' || s[i] == '\'')) {
        ++i;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] != ';' && s[j] != '"' && s[j] != '\'' && s[j] != ' ' && s[j] != '>' && s[j] != '/') {
        ++j;
    }
    if (j == i) {
        return std::nullopt;
    }
    return ascii_lowercase(s.substr(i, j - i));
}

} // namespace

std::optional<std::string> charset_from_content_type(std::string_view content_type) {
    const std::string lower = ascii_lowercase(content_type);
    const auto at = lower.find("charset");
    if (at == std::string::npos) {
        return std::nullopt;
    }
    return charset_after(lower, at + 7);
}

std::optional<std::string> sniff_meta_charset(std::string_view html) {
    const std::string head = ascii_lowercase(html.substr(0, 4096));
    for (auto at = head.find("<meta"); at != std::string::npos; at = head.find("<meta", at + 5)) {
        const auto close = head.find('>', at);
        const std::string_view tag = std::string_view(head).substr(at, close == std::string::npos ? head.size() - at : close - at);
        const auto cs = tag.find("charset");
        if (cs != std::string_view::npos) {
            if (auto found = charset_after(tag, cs + 7)) {
                return found;
            }
        }
    }
    return std::nullopt;
}

std::string to_utf8(std::string bytes, const std::string& charset) {
    if (charset.empty() || charset == "utf-8" || charset == "utf8" || charset == "us-ascii") {
        return bytes;
    }
    iconv_t cd = iconv_open("UTF-8", charset.c_str());
    if (cd == reinterpret_cast<iconv_t>(-1)) {
        return bytes;
    }
    std::string out(bytes.size() * 4 + 16, '\0');
    char* in_ptr = bytes.data();
    std::size_t in_left = bytes.size();
    char* out_ptr = out.data();
    std::size_t out_left = out.size();
    const std::size_t rc = iconv(cd, &in_ptr, &in_left, &out_ptr, &out_left);
    iconv_close(cd);
    if (rc == static_cast<std::size_t>(-1)) {
        return bytes;
    }
    out.resize(out.size() - out_left);
    return out;
}

std::string fetch_url(const std::string& url, int timeout_seconds) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw FetchError("not a URL: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    client.set_write_timeout(timeout_seconds, 0);
    auto res = client.Get(path);
    if (!res) {
        throw FetchError("fetching " + url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw FetchError("fetching " + url + " returned HTTP " + std::to_string(res->status));
    }
    std::optional<std::string> charset = charset_from_content_type(res->get_header_value("Content-Type"));
    if (!charset) {
        charset = sniff_meta_charset(res->body);
    }
    return to_utf8(std::move(res->body), charset.value_or("utf-8"));
}

} // namespace cnr::cli
