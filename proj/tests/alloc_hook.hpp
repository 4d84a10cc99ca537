#pragma once

// Global operator new/delete in this test binary count allocations so the
// fixed-capacity kernels can be checked for heap traffic.

long long test_alloc_count();
