int both(int a, int b) {
  return a && b;
}

int mask(int a, int b) {
  return a & b;
}

int shl(int a, int b) {
  return a << b;
}

int twice(int a) {
  return a * 2;
}

double half(double x) {
  return x * 0.5;
}
