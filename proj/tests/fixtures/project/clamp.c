int clamp(int x, int lo, int hi) {
  if (x < lo) return lo;
  if (x > hi) return hi;
  return x;
}

int scale(int v) {
  int twice = v * 2;
  return v + 1;
}
