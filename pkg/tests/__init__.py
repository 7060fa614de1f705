"""Test suite for R-Trans"""
