"""
ScholarSource Test Suite

This package contains unit, integration, and E2E tests for the ScholarSource application.
"""
