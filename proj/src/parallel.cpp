#include "coac/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>

namespace coac {

int capped_worker_count(int requested)
{
    int workers = std::max(1, requested);
    if (const char* env = std::getenv("COAC_THREADS")) {
        int cap = 0;
        const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), cap);
        if (ec == std::errc() && *ptr == '\0' && cap > 0) {
            workers = std::min(workers, cap);
        }
    }
    return workers;
}

int default_worker_count()
{
    return capped_worker_count(omp_get_max_threads());
}

} // namespace coac
