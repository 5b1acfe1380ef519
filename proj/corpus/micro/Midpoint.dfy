method Midpoint(lo: int, hi: int) returns (m: int)
  requires lo <= hi
  ensures lo <= m && m <= hi
{
  return lo + (hi - lo) / 2;
}
