#include <closurekb/codegen.hpp>

#include <httplib.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

namespace closurekb::codegen {

HttpGenerator::HttpGenerator(std::string url, std::chrono::milliseconds timeout)
    : url_(std::move(url)), timeout_(timeout) {
    if (url_.rfind("http://", 0) != 0) throw GeneratorUnavailable("unsupported endpoint: " + url_);
}

std::string HttpGenerator::generate(const ContextPackage& package) const {
    std::string rest = url_.substr(7);
    std::string::size_type slash = rest.find('/');
    std::string host = rest.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);

    httplib::Client client("http://" + host);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(path, package.to_text(), "text/plain; charset=utf-8");
    if (!res) {
        throw GeneratorUnavailable("endpoint " + url_ + ": " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw GeneratorUnavailable("endpoint " + url_ + " answered HTTP " + std::to_string(res->status));
    }
    return res->body;
}

std::string CommandGenerator::generate(const ContextPackage& package) const {
    char path[] = "/tmp/closurekb-package-XXXXXX";
    int fd = ::mkstemp(path);
    if (fd < 0) throw GeneratorUnavailable("cannot create request file");
    ::close(fd);
    {
        std::ofstream request(path, std::ios::binary);
        request << package.to_text();
    }
    std::string shell = "(" + command_ + ") < '" + std::string(path) + "'";
    FILE* pipe = ::popen(shell.c_str(), "r");
    if (!pipe) {
        std::remove(path);
        throw GeneratorUnavailable("cannot start generator command: " + command_);
    }
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int status = ::pclose(pipe);
    std::remove(path);
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        throw GeneratorUnavailable("generator command failed: " + command_);
    }
    return out;
}

std::unique_ptr<Generator> make_external_generator(const std::string& endpoint) {
    if (endpoint.rfind("exec:", 0) == 0) return std::make_unique<CommandGenerator>(endpoint.substr(5));
    if (endpoint.rfind("http://", 0) == 0) return std::make_unique<HttpGenerator>(endpoint);
    throw GeneratorUnavailable("unsupported generator endpoint: " + endpoint);
}

std::optional<std::string> endpoint_from_env() {
    const char* v = std::getenv(kEndpointEnv);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

}  // namespace closurekb::codegen
