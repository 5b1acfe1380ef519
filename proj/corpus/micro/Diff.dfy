method Diff(a: int, b: int) returns (d: int)
  ensures d + b == a
{
  return a - b;
}
